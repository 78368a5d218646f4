#include "chaoslab/chain.hpp"

#include <string>

#include "chaoslab/dot_generator.hpp"

namespace chaoslab {

namespace {

void check_state(const ChainModel& model, const std::vector<int>& m_vec) {
  if (static_cast<int>(m_vec.size()) != model.sites)
    throw std::domain_error("chain_transitions: state length != L");
  const int half = model.n_fermions / 2;
  for (int m : m_vec)
    if (m < -half || m > half)
      throw std::domain_error("chain_transitions: component m = " +
                              std::to_string(m) + " outside [-N/2, N/2]");
}

// a_2(m) = f_+(m) f_-(m+1) + f_-(m) f_+(m-1) = N + 2s(N-s); edge-safe.
double a2_of_s(int n, int s) {
  return n + 2.0 * s * (n - s);
}

struct SiteRates {
  double up;
  double down;
};

SiteRates site_rates(const ChainModel& model, const std::vector<int>& m_vec,
                     int x) {
  const int l = model.sites;
  const int n = model.n_fermions;
  const int s = m_vec[static_cast<std::size_t>(x)] + n / 2;
  const int s_right = m_vec[static_cast<std::size_t>((x + 1) % l)] + n / 2;
  const int s_left = m_vec[static_cast<std::size_t>((x - 1 + l) % l)] + n / 2;

  const double bond_factor = a2_of_s(n, s_right) + a2_of_s(n, s_left) - 2.0 * n;
  const double n3 = static_cast<double>(n) * n * n;
  const double bond_pref = 6.0 * model.bond_coupling / n3;

  SiteRates r;
  r.up = bond_pref * (n - s) * (n - s - 1.0) * bond_factor;
  r.down = bond_pref * s * (s - 1.0) * bond_factor;
  if (model.onsite_coupling > 0.0) {
    const DotModel dot(n, model.onsite_coupling);
    r.up += dot_growth_rate(dot, s);
    r.down += dot_decay_rate(dot, s);
  }
  // Edge factors make both rates vanish where the target leaves the grid.
  if (s + 2 > n) r.up = 0.0;
  if (s - 2 < 0) r.down = 0.0;
  return r;
}

}  // namespace

SiteUpDown chain_site_updown(const ChainModel& model,
                             const std::vector<int>& m_vec, int site) {
  const SiteRates r = site_rates(model, m_vec, site);
  return {r.up, r.down};
}

TransitionSet chain_transitions(const ChainModel& model,
                                const std::vector<int>& m_vec, int site) {
  check_state(model, m_vec);
  if (site < 0 || site >= model.sites)
    throw std::domain_error("chain_transitions: site index out of range");
  const SiteRates r = site_rates(model, m_vec, site);
  TransitionSet t;
  if (r.up > 0.0) t.moves.push_back({site, +2, r.up});
  if (r.down > 0.0) t.moves.push_back({site, -2, r.down});
  t.diagonal = -(r.up + r.down);
  return t;
}

TransitionSet chain_all_transitions(const ChainModel& model,
                                    const std::vector<int>& m_vec) {
  check_state(model, m_vec);
  TransitionSet t;
  double total = 0.0;
  for (int x = 0; x < model.sites; ++x) {
    const SiteRates r = site_rates(model, m_vec, x);
    if (r.up > 0.0) t.moves.push_back({x, +2, r.up});
    if (r.down > 0.0) t.moves.push_back({x, -2, r.down});
    total += r.up + r.down;
  }
  t.diagonal = -total;
  return t;
}

double chain_diagonal_algebraic(const ChainModel& model,
                                const std::vector<int>& m_vec) {
  check_state(model, m_vec);
  const int l = model.sites;
  const int n = model.n_fermions;
  const double n3 = static_cast<double>(n) * n * n;
  const double binom2 = 0.5 * n * (n - 1);

  double diag = 0.0;
  for (int x = 0; x < l; ++x) {
    const int m = m_vec[static_cast<std::size_t>(x)];
    const int m_next = m_vec[static_cast<std::size_t>((x + 1) % l)];
    // Bond (x, x+1): (6 J2/N^3) [-2 binom(N,2)^2 + (4 m_x^2 - N)(4 m_{x+1}^2 - N)/2].
    diag += 6.0 * model.bond_coupling / n3 *
            (-2.0 * binom2 * binom2 +
             0.5 * (4.0 * m * m - n) * (4.0 * m_next * m_next - n));
    if (model.onsite_coupling > 0.0)
      diag += dot_coeffs(DotModel(n, model.onsite_coupling), m).c0;
  }
  return diag;
}

}  // namespace chaoslab
