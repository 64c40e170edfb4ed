from .shape_diameter import SdfConfig, compute_sdf, load_sdf, save_sdf
