#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace twist::kernels {

using cplx = std::complex<double>;

// Global kernel selection. Parallel is the production path; Serial is the
// reference implementation the tests and the benchmark compare against.
enum class Mode { Serial, Parallel };
extern Mode mode;

// Apply a 2^k x 2^k unitary to a logical vector of 2^n amplitudes stored at
// amps[i * stride], on the given bit positions (shift amounts of the logical
// index). bits[0] is the most significant bit of the local gate index;
// k <= 3. dim is the logical length 2^n.
void apply_serial(cplx* amps, int64_t dim, const int* bits, int k,
                  const Eigen::MatrixXcd& u, int64_t stride = 1);
void apply_parallel(cplx* amps, int64_t dim, const int* bits, int k,
                    const Eigen::MatrixXcd& u, int64_t stride = 1);
void apply(cplx* amps, int64_t dim, const int* bits, int k,
           const Eigen::MatrixXcd& u, int64_t stride = 1);

// Total squared magnitude of amplitudes whose given bit is one.
double prob_one_serial(const cplx* amps, int64_t dim, int bit);
double prob_one_parallel(const cplx* amps, int64_t dim, int bit);
double prob_one(const cplx* amps, int64_t dim, int bit);

}  // namespace twist::kernels
