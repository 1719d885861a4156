__all__ = ['test_bounds', 'test_cli', 'test_control', 'test_coupling', 'test_ctmc', 'test_experiments', 'test_kernels', 'test_meanfield',
           'test_metrics', 'test_reduced1d', 'test_state', 'test_templates']
