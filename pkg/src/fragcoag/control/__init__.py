from .action_function import ActionFunction, ActionPiece, sample_times
from .reward import NormReward, RewardModel, load_reward, state_array, state_norm
from .policy import FeedbackPolicy, Policy, StaticPolicy, TablePolicy, load_policy, threshold_policy
from .values import (action_to_policy, auxiliary_values, chain_reward, construct_policy_from_limit, openloop_brute_value,
                     trajectory_to_action, value_mc)
from .shapley import DPResult, ShapleyDP, evaluate_policy_exact, exhaustive_policy_search, shapley_dp

__all__ = ['ActionFunction', 'ActionPiece', 'sample_times',
           'NormReward', 'RewardModel', 'load_reward', 'state_array', 'state_norm',
           'FeedbackPolicy', 'Policy', 'StaticPolicy', 'TablePolicy', 'load_policy', 'threshold_policy',
           'action_to_policy', 'auxiliary_values', 'chain_reward', 'construct_policy_from_limit', 'openloop_brute_value',
           'trajectory_to_action', 'value_mc',
           'DPResult', 'ShapleyDP', 'evaluate_policy_exact', 'exhaustive_policy_search', 'shapley_dp']
