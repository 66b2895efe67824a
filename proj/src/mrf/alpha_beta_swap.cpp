#include "spmap/mrf/alpha_beta_swap.h"

#include <cmath>

#include "spmap/mrf/max_flow.h"

namespace spmap {

namespace {

// Swap moves stay exact as long as equal classes cost nothing and every
// pairwise value is finite and non-negative; verify once per run.
void checkPotentials(const EnergyProblem& problem) {
  const std::vector<ClassId>& classes = problem.classSet();
  for (size_t e = 0; e < problem.edges().size(); ++e) {
    for (const ClassId a : classes) {
      if (problem.binaryPotential(e, a, a) != 0.0) {
        throw SemiMetricError(
            "alphaBetaSwap: pairwise potential nonzero on equal classes");
      }
      for (const ClassId b : classes) {
        const double value = problem.binaryPotential(e, a, b);
        if (!(value >= 0.0) || !std::isfinite(value)) {
          throw SemiMetricError(
              "alphaBetaSwap: pairwise potential negative or non-finite");
        }
      }
    }
  }
}

}  // namespace

SwapResult alphaBetaSwap(const EnergyProblem& problem) {
  return alphaBetaSwap(problem, problem.initialLabelingByNode());
}

SwapResult alphaBetaSwap(const EnergyProblem& problem,
                         const std::vector<ClassId>& initial_labeling) {
  checkPotentials(problem);

  const std::vector<EnergyProblem::Node>& nodes = problem.nodes();
  const std::vector<EnergyProblem::Edge>& edges = problem.edges();
  const std::vector<ClassId>& classes = problem.classSet();

  SwapResult result;
  result.labeling_by_node = initial_labeling;
  result.initial_energy = problem.totalEnergy(result.labeling_by_node);
  double current_energy = result.initial_energy;

  // Adjacency of problem edges per node, for t-link terms from fixed
  // neighbors.
  std::vector<std::vector<size_t>> incident(nodes.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].node_a].push_back(e);
    incident[edges[e].node_b].push_back(e);
  }

  constexpr int kMaxSweeps = 1000;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool improved = false;
    for (size_t ci = 0; ci < classes.size(); ++ci) {
      for (size_t cj = ci + 1; cj < classes.size(); ++cj) {
        const ClassId alpha = classes[ci];
        const ClassId beta = classes[cj];

        std::vector<size_t> members;
        std::vector<int> flow_index(nodes.size(), -1);
        for (size_t i = 0; i < nodes.size(); ++i) {
          if (result.labeling_by_node[i] == alpha ||
              result.labeling_by_node[i] == beta) {
            flow_index[i] = static_cast<int>(members.size()) + 2;
            members.push_back(i);
          }
        }
        if (members.empty()) {
          continue;
        }

        // Source (0) keeps alpha, sink (1) keeps beta: a node ends on the
        // source side of the cut iff it takes alpha.
        FlowNetwork network(static_cast<int>(members.size()) + 2);
        std::vector<double> to_alpha(members.size(), 0.0);  // cut when alpha
        std::vector<double> to_beta(members.size(), 0.0);   // cut when beta
        for (size_t m = 0; m < members.size(); ++m) {
          const size_t i = members[m];
          to_alpha[m] += problem.unaryPotential(i, alpha);
          to_beta[m] += problem.unaryPotential(i, beta);
          for (const size_t e : incident[i]) {
            const EnergyProblem::Edge& edge = edges[e];
            const size_t other = edge.node_a == i ? edge.node_b : edge.node_a;
            if (flow_index[other] != -1) {
              continue;  // both endpoints active: handled as an n-link below
            }
            const ClassId fixed = result.labeling_by_node[other];
            if (edge.node_a == i) {
              to_alpha[m] += problem.binaryPotential(e, alpha, fixed);
              to_beta[m] += problem.binaryPotential(e, beta, fixed);
            } else {
              to_alpha[m] += problem.binaryPotential(e, fixed, alpha);
              to_beta[m] += problem.binaryPotential(e, fixed, beta);
            }
          }
        }

        for (const EnergyProblem::Edge& edge : edges) {
          const int fa = flow_index[edge.node_a];
          const int fb = flow_index[edge.node_b];
          if (fa == -1 || fb == -1) {
            continue;
          }
          const size_t e = static_cast<size_t>(&edge - edges.data());
          // 2x2 move table: equal-class costs vanish, the two mixed costs
          // may differ. The exact encoding splits them over one n-link and
          // both t-links (plus a constant that cancels in the comparison).
          const double cost_ab = problem.binaryPotential(e, alpha, beta);
          const double cost_ba = problem.binaryPotential(e, beta, alpha);
          network.addEdge(fa, fb, cost_ab + cost_ba);
          to_beta[fa - 2] += cost_ba;   // s -> a
          to_alpha[fb - 2] += cost_ba;  // b -> t
        }

        for (size_t m = 0; m < members.size(); ++m) {
          network.addEdge(0, static_cast<int>(m) + 2, to_beta[m]);
          network.addEdge(static_cast<int>(m) + 2, 1, to_alpha[m]);
        }

        const FlowNetwork::Result cut = network.maxFlowMinCut(0, 1);

        std::vector<ClassId> candidate = result.labeling_by_node;
        for (size_t m = 0; m < members.size(); ++m) {
          candidate[members[m]] =
              cut.source_side[m + 2] ? alpha : beta;
        }
        const double candidate_energy = problem.totalEnergy(candidate);
        if (candidate_energy < current_energy - 1e-12) {
          result.labeling_by_node = std::move(candidate);
          current_energy = candidate_energy;
          ++result.accepted_moves;
          improved = true;
        }
      }
    }
    result.sweep_energies.push_back(current_energy);
    if (!improved) {
      break;
    }
  }

  result.final_energy = current_energy;
  return result;
}

}  // namespace spmap
