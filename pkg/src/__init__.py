# AITV Poisson Denoising: source package
