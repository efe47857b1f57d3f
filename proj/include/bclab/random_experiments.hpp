#ifndef BCLAB_RANDOM_EXPERIMENTS_HPP
#define BCLAB_RANDOM_EXPERIMENTS_HPP

#include "bclab/conditioning.hpp"
#include "bclab/experiment.hpp"
#include "bclab/rng.hpp"

namespace bclab {

// Generators shared by the randomized sweeps. All draw from a SubRng so a
// trial is a pure function of its stream key.

/// Rows drawn flat on the simplex; with some probability a sparsity mask
/// is applied (keeping at least one positive entry per row) so zero
/// columns and support dropping get exercised.
Eigen::MatrixXd random_stochastic_matrix(SubRng& rng, int n_parameters, int n_observations);

/// Random partition of {0,...,n-1}: a uniform block count, then uniform
/// assignment, empty blocks dropped.
Partition random_partition(SubRng& rng, int n);

/// Coarsens the given partition by merging one uniformly chosen pair of
/// blocks; identity when only one block remains.
Partition merge_random_blocks(SubRng& rng, const Partition& part);

/// Either the uniform mixture of the rows or a strictly positive random
/// weight vector; both dominate the family.
DominatingMeasure random_privileged_measure(SubRng& rng, const DiscreteExperiment& exp);

}  // namespace bclab

#endif
