"""advlab: a desk-scale adversarial robustness laboratory.

Subpackages:
  imagekit  image types, thresholding, dilation, contours, RoI extraction
  gradnet   from-scratch differentiable classifier with exact backprop
  attacks   six white-box attacks, including the RoI-guided momentum one
  defences  adversarial training, pixel deflection, defensive distillation
  metrics   norms, perturbation percentages, accuracy, ROC-AUC
  bench     synthetic data, experiment orchestration, sweeps, reports
"""

__version__ = "0.1.0"
