#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nrpos/prs.hpp"

namespace nrpos::estimator {

// USRP B210 ADC rate used by the testbed; one native tap is 1/46.08 MHz.
inline constexpr double kDefaultNativeSampleRateHz = 46.08e6;

// Least-squares channel estimate on the de-staggered PRS subcarrier lattice.
struct Cfr {
  std::vector<std::complex<double>> values;
  std::vector<int> subcarriers;        // grid subcarrier index of each value, ascending
  std::vector<int> symbols_combined;   // PRS symbols averaged into each value
  int grid_subcarriers = 0;            // 12 * n_prb
  double scs_hz = 0.0;
};

// H(k) = Y(k) / X(k) on every RE where the reference is non-zero, averaged
// coherently over the PRS symbols that land on the same subcarrier.
// Throws EmptyReference when the reference grid carries no PRS, and
// InvalidArgument when the grid shapes differ.
Cfr estimate_cfr(const prs::ResourceGrid& rx, const prs::ResourceGrid& ref);

struct Cir {
  std::vector<std::complex<double>> taps;
  int oversample_factor = 1;
  double native_sample_rate_hz = kDefaultNativeSampleRateHz;

  double tap_spacing_s() const noexcept;
  std::size_t native_tap_count() const noexcept;
  // Span of the circular inverse transform, native_tap_count / native rate.
  double unambiguous_range_s() const noexcept;
};

// FFT length at the native rate; throws InvalidArgument unless the rate is
// an integer multiple of scs_hz no smaller than the occupied band.
std::size_t native_tap_count(double native_sample_rate_hz, double scs_hz, int grid_subcarriers);

// Digital interpolation: places the CFR on its baseband bins, zero-fills up
// to oversample_factor times the native FFT length and inverse transforms.
// Scaled by 1/sqrt(N) so that sum |cir|^2 == sum |cfr|^2.
Cir interpolate_cir(const Cfr& cfr, int oversample_factor,
                    double native_sample_rate_hz = kDefaultNativeSampleRateHz);

enum class DetectionMode { MaxPeak, FirstPath };

struct DetectOptions {
  DetectionMode mode = DetectionMode::MaxPeak;
  double threshold_db = 10.0;  // FirstPath: taps within this much of the peak qualify
  bool refine = false;         // parabolic sub-tap refinement of the chosen tap
};

struct ToaEstimate {
  double toa_s = 0.0;
  std::size_t peak_index = 0;
  double peak_magnitude = 0.0;
  double second_peak_ratio = 0.0;  // next-largest local maximum / peak
};

// Throws AllZero for an identically zero CIR.
ToaEstimate detect_toa(const Cir& cir, const DetectOptions& options = {});

// Maps a circular TOA in [0, range) onto [-range/2, range/2).
double signed_toa(double toa_s, double range_s) noexcept;

}  // namespace nrpos::estimator
