"""Sparse Gaussian occupancy: sampling, splatting, fusion, metrics and losses."""

from ._gsocc import (
    Camera,
    Config,
    Frame,
    GaussianSet,
    GridSpec,
    GsoccError,
    MemoryBank,
    OccupancyGrid,
    Scene,
    cross_entropy,
    default_room_camera,
    evaluate,
    focal_loss,
    frustum_mask,
    generate_room_scene,
    half_view_cameras,
    huber_depth,
    load_camera,
    load_gaussians,
    load_grid,
    lovasz_softmax,
    monocular_gaussians,
    oracle_occupancy,
    prune,
    render_depth,
    run_monocular,
    save_camera,
    save_gaussians,
    save_grid,
    splat,
    volumetric_sample,
)

__all__ = [name for name in dir() if not name.startswith("_")]
