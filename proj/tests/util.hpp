#pragma once

#include <random>

#include "bigm/gadgets.hpp"
#include "bigm/model.hpp"

namespace testutil {

using bigm::IlpInstance;
using bigm::Mat;
using bigm::Rational;
using bigm::Vec;

inline int rand_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Rational rand_coeff(std::mt19937& rng, int mag) {
  return Rational(rand_int(rng, -mag, mag));
}

// Random 0/1 ILP with integral data and the zero point feasible.
inline IlpInstance random_ilp(std::mt19937& rng, int max_n, int max_rows = 2,
                              int mag = 3) {
  IlpInstance ilp;
  int n = rand_int(rng, 1, max_n);
  int m = rand_int(rng, 0, max_rows);
  for (int i = 0; i < n; ++i) ilp.c.push_back(rand_coeff(rng, mag));
  for (int r = 0; r < m; ++r) {
    Vec row;
    for (int i = 0; i < n; ++i) row.push_back(rand_coeff(rng, 2));
    ilp.A.push_back(std::move(row));
    ilp.b.push_back(Rational(rand_int(rng, 0, 2 * n)));
  }
  ilp.validate();
  return ilp;
}

// Random bilevel instance with a box-bounded binary leader, a box-bounded
// follower (so the dual polyhedron is nonempty), a few extra follower rows,
// and optionally one coupling row y_j ≤ x_i.
inline bigm::BlpInstance random_bilevel(std::mt19937& rng, int n_l, int n_f,
                                        int extra_f, bool with_coupling) {
  bigm::BlpInstance inst;
  inst.n_l = n_l;
  inst.n_f = n_f;
  inst.leader_binary = true;
  int m_l = 2 * n_l + (with_coupling ? 1 : 0);
  int m_f = 2 * n_f + extra_f;
  inst.m_l = m_l;
  inst.m_f = m_f;
  for (int i = 0; i < n_l; ++i) inst.a.push_back(rand_coeff(rng, 3));
  for (int i = 0; i < n_f; ++i) {
    inst.d.push_back(rand_coeff(rng, 3));
    inst.g.push_back(rand_coeff(rng, 3));
  }
  inst.H.assign(m_l, bigm::zeros(n_l));
  inst.G.assign(m_l, bigm::zeros(n_f));
  inst.h = bigm::zeros(m_l);
  for (int i = 0; i < n_l; ++i) {
    inst.H[i][i] = 1;
    inst.h[i] = 1;
    inst.H[n_l + i][i] = -1;
  }
  if (with_coupling) {
    int i = rand_int(rng, 0, n_l - 1), j = rand_int(rng, 0, n_f - 1);
    inst.H[2 * n_l][i] = -1;  // y_j ≤ x_i
    inst.G[2 * n_l][j] = 1;
  }
  inst.L.assign(m_f, bigm::zeros(n_l));
  inst.F.assign(m_f, bigm::zeros(n_f));
  inst.f = bigm::zeros(m_f);
  for (int i = 0; i < n_f; ++i) {
    inst.F[i][i] = 1;  // y_i ≤ 1
    inst.f[i] = 1;
    inst.F[n_f + i][i] = -1;  // -y_i ≤ 0
  }
  for (int r = 0; r < extra_f; ++r) {
    for (int i = 0; i < n_l; ++i) inst.L[2 * n_f + r][i] = rand_coeff(rng, 2);
    for (int i = 0; i < n_f; ++i) inst.F[2 * n_f + r][i] = rand_coeff(rng, 2);
    // rhs large enough that (x, y) = (0, 0) stays feasible
    inst.f[2 * n_f + r] = Rational(rand_int(rng, 0, 3));
  }
  inst.validate();
  return inst;
}

}  // namespace testutil
