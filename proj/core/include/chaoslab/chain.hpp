#ifndef CHAOSLAB_CHAIN_HPP
#define CHAOSLAB_CHAIN_HPP

#include <vector>

#include "chaoslab/types.hpp"

namespace chaoslab {

/// Outgoing transitions of one chain state at one site: size moves of +-2 with
/// non-negative rates, plus the diagonal that closes the column sum over the
/// moves listed here.
struct TransitionSet {
  struct Move {
    int site;
    int delta;    // +2 or -2 on m_site
    double rate;  // >= 0
  };
  std::vector<Move> moves;
  double diagonal = 0.0;
};

/// Rates for m_x -> m_x +- 2 at site x of the periodic chain, combining the
/// bond term (J2, neighbors enter through a_2) and the on-site term (J1).
/// Components of m_vec must lie in [-N/2, N/2]; rates at the grid edges vanish
/// by construction.
TransitionSet chain_transitions(const ChainModel& model,
                                const std::vector<int>& m_vec, int site);

/// Convenience: transitions for all sites; diagonal covers the whole column.
TransitionSet chain_all_transitions(const ChainModel& model,
                                    const std::vector<int>& m_vec);

/// Diagonal entry of the chain generator computed from the operator algebra
/// instead of rate closure. Equality of the two is the conservation check.
double chain_diagonal_algebraic(const ChainModel& model,
                                const std::vector<int>& m_vec);

/// Allocation-free raising/lowering rates of one site, for samplers.
struct SiteUpDown {
  double up;
  double down;
};
SiteUpDown chain_site_updown(const ChainModel& model,
                             const std::vector<int>& m_vec, int site);

}  // namespace chaoslab

#endif
