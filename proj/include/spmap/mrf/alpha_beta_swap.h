#ifndef SPMAP_MRF_ALPHA_BETA_SWAP_H_
#define SPMAP_MRF_ALPHA_BETA_SWAP_H_

#include <vector>

#include "spmap/mrf/energy.h"

namespace spmap {

struct SemiMetricError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SwapResult {
  std::vector<ClassId> labeling_by_node;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  // Energy after each sweep over all class pairs (non-increasing).
  std::vector<double> sweep_energies;
  int accepted_moves = 0;
};

// Minimizes the problem energy by swap moves: for every class pair, one
// min-cut optimally reassigns the nodes currently holding those two classes.
// Sweeps repeat until no pair improves. The pairwise potentials must vanish
// on equal classes and be non-negative (checked up front).
SwapResult alphaBetaSwap(const EnergyProblem& problem,
                         const std::vector<ClassId>& initial_labeling);

// Convenience: starts from the evidence-argmax labeling.
SwapResult alphaBetaSwap(const EnergyProblem& problem);

}  // namespace spmap

#endif  // SPMAP_MRF_ALPHA_BETA_SWAP_H_
