#pragma once

#include "fdpboot/model.hpp"

#include <cstdint>
#include <vector>

namespace fdpboot {

// Stationary unit-variance Gaussian random fields on a rows x cols lattice,
// built by smoothing white noise with a truncated Gaussian kernel. fwhm is
// in pixel units; fwhm = 0 means raw white noise.
struct GrfConfig {
  int rows = 0;
  int cols = 0;
  double fwhm = 0.0;
  int n_fields = 1;
  std::uint64_t seed = 0;
};

double grf_sigma(double fwhm);  // fwhm / (2 sqrt(2 ln 2))

// Analytic lag-d autocorrelation exp(-d^2 / (4 sigma^2)) of the smoothed
// (untruncated) field; the truncated kernel matches it closely.
double grf_autocorrelation(double fwhm, double distance);

// White noise is drawn on the grid enlarged by the kernel radius on every
// side, convolved separably, normalized by the exact kernel L2 norm and
// cropped, so every pixel (corners included) has variance exactly 1.
std::vector<Matrix> generate_grf(const GrfConfig& config, int threads = 1);

}  // namespace fdpboot
