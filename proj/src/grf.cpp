#include "fdpboot/grf.hpp"

#include "fdpboot/parallel.hpp"
#include "fdpboot/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fdpboot {

double grf_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

double grf_autocorrelation(double fwhm, double distance) {
  const double sigma = grf_sigma(fwhm);
  if (sigma == 0.0) return distance == 0.0 ? 1.0 : 0.0;
  return std::exp(-distance * distance / (4.0 * sigma * sigma));
}

namespace {

std::vector<double> kernel_weights(double sigma, int radius) {
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  for (int j = -radius; j <= radius; ++j) {
    w[static_cast<std::size_t>(j + radius)] = std::exp(-0.5 * j * j / (sigma * sigma));
  }
  return w;
}

}  // namespace

std::vector<Matrix> generate_grf(const GrfConfig& config, int threads) {
  if (config.rows < 1 || config.cols < 1) {
    throw std::invalid_argument("grf: dims must be >= 1");
  }
  if (config.fwhm < 0.0) throw std::invalid_argument("grf: fwhm must be >= 0");
  if (config.n_fields < 1) throw std::invalid_argument("grf: n_fields must be >= 1");

  const double sigma = grf_sigma(config.fwhm);
  const int radius = config.fwhm > 0.0 ? static_cast<int>(std::ceil(4.0 * sigma)) : 0;
  std::vector<double> weights;
  double norm = 1.0;
  if (radius > 0) {
    weights = kernel_weights(sigma, radius);
    double sq = 0.0;
    for (double w : weights) sq += w * w;
    norm = std::sqrt(sq);  // each separable pass divides by ||w||_2
  }

  std::vector<Matrix> fields(static_cast<std::size_t>(config.n_fields));
  parallel_for(config.n_fields, threads, [&](int idx) {
    Rng rng(child_seed(config.seed, static_cast<std::uint64_t>(idx)));
    const int er = config.rows + 2 * radius;
    const int ec = config.cols + 2 * radius;
    Matrix noise(er, ec);
    for (int r = 0; r < er; ++r) {
      for (int c = 0; c < ec; ++c) noise(r, c) = rng.normal();
    }
    if (radius == 0) {
      fields[static_cast<std::size_t>(idx)] = std::move(noise);
      return;
    }
    // Horizontal pass on all enlarged rows, valid columns only.
    Matrix pass1(er, config.cols);
    for (int r = 0; r < er; ++r) {
      for (int c = 0; c < config.cols; ++c) {
        double acc = 0.0;
        for (int j = -radius; j <= radius; ++j) {
          acc += weights[static_cast<std::size_t>(j + radius)] * noise(r, c + radius + j);
        }
        pass1(r, c) = acc / norm;
      }
    }
    // Vertical pass, cropping to the requested grid.
    Matrix out(config.rows, config.cols);
    for (int r = 0; r < config.rows; ++r) {
      for (int c = 0; c < config.cols; ++c) {
        double acc = 0.0;
        for (int j = -radius; j <= radius; ++j) {
          acc += weights[static_cast<std::size_t>(j + radius)] * pass1(r + radius + j, c);
        }
        out(r, c) = acc / norm;
      }
    }
    fields[static_cast<std::size_t>(idx)] = std::move(out);
  });
  return fields;
}

}  // namespace fdpboot
