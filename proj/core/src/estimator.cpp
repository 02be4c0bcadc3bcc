#include "nrpos/estimator.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos::estimator {

namespace {

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
class BackwardPlanCache {
 public:
  ~BackwardPlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

BackwardPlanCache& plan_cache() {
  static BackwardPlanCache cache;
  return cache;
}

}  // namespace

Cfr estimate_cfr(const prs::ResourceGrid& rx, const prs::ResourceGrid& ref) {
  if (rx.num_symbols() != ref.num_symbols() || rx.num_subcarriers() != ref.num_subcarriers()) {
    throw Error(ErrorCode::InvalidArgument, "received and reference grids differ in shape");
  }
  const int n_sc = ref.num_subcarriers();
  std::vector<std::complex<double>> sum(static_cast<std::size_t>(n_sc), {0.0, 0.0});
  std::vector<int> count(static_cast<std::size_t>(n_sc), 0);

  for (int l = 0; l < ref.num_symbols(); ++l) {
    const auto x = ref.symbol(l);
    const auto y = rx.symbol(l);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] != std::complex<double>{}) {
        sum[k] += y[k] / x[k];
        ++count[k];
      }
    }
  }

  Cfr cfr;
  cfr.grid_subcarriers = n_sc;
  cfr.scs_hz = ref.scs_hz();
  for (int k = 0; k < n_sc; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (count[i] == 0) continue;
    cfr.values.push_back(sum[i] / static_cast<double>(count[i]));
    cfr.subcarriers.push_back(k);
    cfr.symbols_combined.push_back(count[i]);
  }
  if (cfr.values.empty()) {
    throw Error(ErrorCode::EmptyReference, "reference grid has no occupied resource elements");
  }
  return cfr;
}

double Cir::tap_spacing_s() const noexcept {
  return 1.0 / (native_sample_rate_hz * static_cast<double>(oversample_factor));
}

std::size_t Cir::native_tap_count() const noexcept {
  return taps.size() / static_cast<std::size_t>(oversample_factor);
}

double Cir::unambiguous_range_s() const noexcept {
  return static_cast<double>(native_tap_count()) / native_sample_rate_hz;
}

std::size_t native_tap_count(double native_sample_rate_hz, double scs_hz, int grid_subcarriers) {
  const double ratio = native_sample_rate_hz / scs_hz;
  const double n = std::round(ratio);
  if (!(scs_hz > 0.0) || std::abs(ratio - n) > 1e-9 * ratio || n < grid_subcarriers) {
    throw Error(ErrorCode::InvalidArgument,
                "native sample rate " + std::to_string(native_sample_rate_hz) +
                    " Hz is not an integer multiple of the subcarrier spacing covering " +
                    std::to_string(grid_subcarriers) + " subcarriers");
  }
  return static_cast<std::size_t>(n);
}

Cir interpolate_cir(const Cfr& cfr, int oversample_factor, double native_sample_rate_hz) {
  if (oversample_factor < 1) {
    throw Error(ErrorCode::InvalidArgument, "oversample factor must be at least 1");
  }
  const std::size_t native = native_tap_count(native_sample_rate_hz, cfr.scs_hz, cfr.grid_subcarriers);
  const std::size_t n = native * static_cast<std::size_t>(oversample_factor);
  const auto n_signed = static_cast<long>(n);

  Cir cir;
  cir.oversample_factor = oversample_factor;
  cir.native_sample_rate_hz = native_sample_rate_hz;
  cir.taps.assign(n, {0.0, 0.0});

  const int centre = cfr.grid_subcarriers / 2;
  for (std::size_t i = 0; i < cfr.values.size(); ++i) {
    long bin = (cfr.subcarriers[i] - centre) % n_signed;
    if (bin < 0) bin += n_signed;
    cir.taps[static_cast<std::size_t>(bin)] = cfr.values[i];
  }

  auto* data = reinterpret_cast<fftw_complex*>(cir.taps.data());
  fftw_execute_dft(plan_cache().get(n), data, data);

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : cir.taps) v *= scale;
  return cir;
}

ToaEstimate detect_toa(const Cir& cir, const DetectOptions& options) {
  const std::size_t n = cir.taps.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty channel impulse response");

  std::vector<double> mag(n);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = std::sqrt(std::norm(cir.taps[i]));
    if (mag[i] > mag[peak]) peak = i;
  }
  if (mag[peak] == 0.0) throw Error(ErrorCode::AllZero, "channel impulse response is all zero");

  ToaEstimate est;
  est.peak_magnitude = mag[peak];

  double second = 0.0;
  const auto consider = [&](std::size_t i, double prev, double next) {
    if (i != peak && mag[i] > prev && mag[i] >= next) second = std::max(second, mag[i]);
  };
  if (n == 1) {
    second = 0.0;
  } else {
    consider(0, mag[n - 1], mag[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) consider(i, mag[i - 1], mag[i + 1]);
    consider(n - 1, mag[n - 2], mag[0]);
  }
  est.second_peak_ratio = second / mag[peak];

  std::size_t chosen = peak;
  if (options.mode == DetectionMode::FirstPath) {
    const double threshold = mag[peak] * std::pow(10.0, -options.threshold_db / 20.0);
    // Earliest qualifying tap within half a period before the peak.
    for (std::size_t back = n / 2; back > 0; --back) {
      const std::size_t i = (peak + n - back) % n;
      if (mag[i] >= threshold) {
        chosen = i;
        break;
      }
    }
  }
  est.peak_index = chosen;

  double position = static_cast<double>(chosen);
  if (options.refine) {
    const double a = mag[(chosen + n - 1) % n];
    const double b = mag[chosen];
    const double c = mag[(chosen + 1) % n];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) position += 0.5 * (a - c) / denom;
  }
  est.toa_s = position * cir.tap_spacing_s();
  return est;
}

double signed_toa(double toa_s, double range_s) noexcept {
  double t = std::fmod(toa_s, range_s);
  if (t < 0.0) t += range_s;
  if (t >= 0.5 * range_s) t -= range_s;
  return t;
}

}  // namespace nrpos::estimator
