#include "twist/kernels.hpp"

#include <algorithm>

namespace twist::kernels {

Mode mode = Mode::Parallel;

namespace {

// Spreads a compact group index across the full index space, inserting a
// zero at each target bit. positions must be ascending.
inline int64_t expand(int64_t i, const int* pos_asc, int k) {
  for (int t = 0; t < k; ++t) {
    const int p = pos_asc[t];
    const int64_t low = i & ((int64_t{1} << p) - 1);
    i = ((i >> p) << (p + 1)) | low;
  }
  return i;
}

struct GatePlan {
  int pos_asc[3];    // target bit positions, ascending
  int64_t local[8];  // logical-index offset of each local basis state
  int k;
  int64_t groups;
};

GatePlan plan(int64_t dim, const int* bits, int k) {
  GatePlan g;
  g.k = k;
  g.groups = dim >> k;
  std::copy(bits, bits + k, g.pos_asc);
  std::sort(g.pos_asc, g.pos_asc + k);
  for (int64_t l = 0; l < (int64_t{1} << k); ++l) {
    int64_t off = 0;
    for (int t = 0; t < k; ++t)
      if (l >> (k - 1 - t) & 1) off |= int64_t{1} << bits[t];
    g.local[l] = off;
  }
  return g;
}

inline void apply_group(cplx* amps, const GatePlan& g,
                        const Eigen::MatrixXcd& u, int64_t i, int64_t stride) {
  const int64_t base = expand(i, g.pos_asc, g.k);
  const int64_t m = int64_t{1} << g.k;
  cplx in[8], out[8];
  for (int64_t l = 0; l < m; ++l) in[l] = amps[(base | g.local[l]) * stride];
  for (int64_t r = 0; r < m; ++r) {
    cplx acc = 0;
    for (int64_t c = 0; c < m; ++c) acc += u(r, c) * in[c];
    out[r] = acc;
  }
  for (int64_t l = 0; l < m; ++l) amps[(base | g.local[l]) * stride] = out[l];
}

}  // namespace

void apply_serial(cplx* amps, int64_t dim, const int* bits, int k,
                  const Eigen::MatrixXcd& u, int64_t stride) {
  const GatePlan g = plan(dim, bits, k);
  for (int64_t i = 0; i < g.groups; ++i) apply_group(amps, g, u, i, stride);
}

void apply_parallel(cplx* amps, int64_t dim, const int* bits, int k,
                    const Eigen::MatrixXcd& u, int64_t stride) {
  const GatePlan g = plan(dim, bits, k);
#ifdef TWIST_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (g.groups >= 4096)
#endif
  for (int64_t i = 0; i < g.groups; ++i) apply_group(amps, g, u, i, stride);
}

void apply(cplx* amps, int64_t dim, const int* bits, int k,
           const Eigen::MatrixXcd& u, int64_t stride) {
  if (mode == Mode::Serial)
    apply_serial(amps, dim, bits, k, u, stride);
  else
    apply_parallel(amps, dim, bits, k, u, stride);
}

double prob_one_serial(const cplx* amps, int64_t dim, int bit) {
  const int64_t w = int64_t{1} << bit;
  double p = 0;
  for (int64_t i = 0; i < dim; ++i)
    if (i & w) p += std::norm(amps[i]);
  return p;
}

double prob_one_parallel(const cplx* amps, int64_t dim, int bit) {
  const int64_t w = int64_t{1} << bit;
  double p = 0;
#ifdef TWIST_HAVE_OPENMP
#pragma omp parallel for schedule(static) reduction(+ : p) if (dim >= 8192)
#endif
  for (int64_t i = 0; i < dim; ++i)
    if (i & w) p += std::norm(amps[i]);
  return p;
}

double prob_one(const cplx* amps, int64_t dim, int bit) {
  return mode == Mode::Serial ? prob_one_serial(amps, dim, bit)
                              : prob_one_parallel(amps, dim, bit);
}

}  // namespace twist::kernels
