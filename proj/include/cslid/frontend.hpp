// cslid/frontend.hpp -- log mel-filterbank energies from raw audio.
//
// Pipeline: pre-emphasis -> framing -> Hamming window -> |FFT|^2 ->
// triangular mel filterbank -> floor -> natural log. Defaults give
// 26-dimensional features at a 25 ms window / 10 ms shift.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "cslid/tensor.hpp"
#include "cslid/util.hpp"
#include "cslid/wav.hpp"

namespace cslid {

struct FrontendConfig {
  double preemphasis = 0.97;
  double frame_length_s = 0.025;
  double frame_shift_s = 0.010;
  int num_filters = 26;
  double log_floor = 1e-10;
  // Per-utterance mean/variance normalization of the log energies; off by
  // default.
  bool normalize = false;
};

inline Waveform preemphasize(const Waveform& w, double alpha) {
  if (w.samples.empty()) throw DataError("preemphasize: empty input");
  if (alpha < 0.0 || alpha >= 1.0) throw DataError("preemphasize: alpha out of [0,1)");
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(w.samples.size());
  out.samples[0] = w.samples[0];
  for (std::size_t n = 1; n < w.samples.size(); ++n)
    out.samples[n] = w.samples[n] - alpha * w.samples[n - 1];
  return out;
}

inline Index frame_count(Index num_samples, Index frame_samples, Index shift_samples) {
  if (num_samples < frame_samples) return 0;
  return (num_samples - frame_samples) / shift_samples + 1;
}

// Frames as a matrix, one frame per row; trailing samples that do not fill a
// whole frame are dropped.
inline Tensor<double> frame_signal(const Waveform& w, double frame_length_s,
                                   double frame_shift_s) {
  if (frame_shift_s <= 0 || frame_length_s < frame_shift_s)
    throw DataError("frame_signal: need frame_length >= frame_shift > 0");
  Index frame_samples = static_cast<Index>(std::llround(frame_length_s * w.sample_rate));
  Index shift_samples = static_cast<Index>(std::llround(frame_shift_s * w.sample_rate));
  if (frame_samples <= 0 || shift_samples <= 0)
    throw DataError("frame_signal: window shorter than one sample");
  Index n = static_cast<Index>(w.samples.size());
  Index frames = frame_count(n, frame_samples, shift_samples);
  if (frames <= 0) throw DataError("utterance too short");
  Tensor<double> out({frames, frame_samples});
  for (Index f = 0; f < frames; ++f)
    for (Index k = 0; k < frame_samples; ++k)
      out(f, k) = w.samples[static_cast<std::size_t>(f * shift_samples + k)];
  return out;
}

// Symmetric Hamming window: 0.54 - 0.46 cos(2 pi k / (N - 1)).
inline std::vector<double> hamming_window(Index n) {
  std::vector<double> win(static_cast<std::size_t>(n), 1.0);
  if (n == 1) return win;
  for (Index k = 0; k < n; ++k)
    win[static_cast<std::size_t>(k)] =
        0.54 - 0.46 * std::cos(2.0 * M_PI * k / static_cast<double>(n - 1));
  return win;
}

namespace fft_detail {

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace fft_detail

// Power spectrum of one windowed frame, bins 0..nfft/2.
inline std::vector<double> power_spectrum(const double* frame, Index n, Index nfft) {
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(nfft), {0.0, 0.0});
  for (Index k = 0; k < n; ++k) buf[static_cast<std::size_t>(k)] = frame[k];
  fft_detail::fft_inplace(buf);
  std::vector<double> out(static_cast<std::size_t>(nfft / 2 + 1));
  for (Index k = 0; k <= nfft / 2; ++k)
    out[static_cast<std::size_t>(k)] = std::norm(buf[static_cast<std::size_t>(k)]);
  return out;
}

inline double hz_to_mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

class MelFilterbank {
 public:
  // num_filters triangular filters with mel-spaced centers over [low_hz, high_hz].
  MelFilterbank(int num_filters, int sample_rate, Index nfft, double low_hz = 0.0,
                double high_hz = 0.0) {
    if (high_hz <= 0.0) high_hz = sample_rate / 2.0;
    double low_mel = hz_to_mel(low_hz), high_mel = hz_to_mel(high_hz);
    std::vector<double> edges(static_cast<std::size_t>(num_filters) + 2);
    for (int i = 0; i < num_filters + 2; ++i)
      edges[static_cast<std::size_t>(i)] =
          mel_to_hz(low_mel + (high_mel - low_mel) * i / (num_filters + 1));
    centers_.assign(edges.begin() + 1, edges.end() - 1);

    Index bins = nfft / 2 + 1;
    weights_ = Tensor<double>({num_filters, bins});
    for (int m = 0; m < num_filters; ++m) {
      double left = edges[static_cast<std::size_t>(m)];
      double center = edges[static_cast<std::size_t>(m) + 1];
      double right = edges[static_cast<std::size_t>(m) + 2];
      for (Index k = 0; k < bins; ++k) {
        double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
        double w = 0.0;
        if (f > left && f < center) w = (f - left) / (center - left);
        else if (f >= center && f < right) w = (right - f) / (right - center);
        weights_(m, k) = w;
      }
    }
  }

  int num_filters() const { return static_cast<int>(weights_.rows()); }
  const std::vector<double>& center_frequencies() const { return centers_; }

  // Filterbank energies for one power spectrum.
  void apply(const std::vector<double>& power, double* out) const {
    for (Index m = 0; m < weights_.rows(); ++m) {
      double e = 0.0;
      for (Index k = 0; k < weights_.cols(); ++k)
        e += weights_(m, k) * power[static_cast<std::size_t>(k)];
      out[m] = e;
    }
  }

 private:
  Tensor<double> weights_;
  std::vector<double> centers_;
};

inline Tensor<double> extract_features(const Waveform& w, const FrontendConfig& cfg = {}) {
  Waveform emphasized = preemphasize(w, cfg.preemphasis);
  Tensor<double> frames = frame_signal(emphasized, cfg.frame_length_s, cfg.frame_shift_s);
  const Index n_frames = frames.rows();
  const Index frame_samples = frames.cols();
  const Index nfft = fft_detail::next_pow2(frame_samples);
  std::vector<double> window = hamming_window(frame_samples);
  MelFilterbank bank(cfg.num_filters, w.sample_rate, nfft);

  Tensor<double> features({n_frames, cfg.num_filters});
  std::vector<double> frame(static_cast<std::size_t>(frame_samples));
  for (Index t = 0; t < n_frames; ++t) {
    for (Index k = 0; k < frame_samples; ++k)
      frame[static_cast<std::size_t>(k)] = frames(t, k) * window[static_cast<std::size_t>(k)];
    std::vector<double> power = power_spectrum(frame.data(), frame_samples, nfft);
    bank.apply(power, &features(t, 0));
    for (int m = 0; m < cfg.num_filters; ++m)
      features(t, m) = std::log(std::max(features(t, m), cfg.log_floor));
  }

  if (cfg.normalize) {
    for (int m = 0; m < cfg.num_filters; ++m) {
      double mean = 0.0;
      for (Index t = 0; t < n_frames; ++t) mean += features(t, m);
      mean /= static_cast<double>(n_frames);
      double var = 0.0;
      for (Index t = 0; t < n_frames; ++t) {
        double d = features(t, m) - mean;
        var += d * d;
      }
      double scale = 1.0 / std::sqrt(var / static_cast<double>(n_frames) + 1e-8);
      for (Index t = 0; t < n_frames; ++t) features(t, m) = (features(t, m) - mean) * scale;
    }
  }
  return features;
}

// Debug CSV: one frame per line.
inline std::string features_to_csv(const Tensor<double>& f) {
  std::string out;
  char buf[48];
  for (Index t = 0; t < f.rows(); ++t) {
    for (Index m = 0; m < f.cols(); ++m) {
      std::snprintf(buf, sizeof(buf), "%.6f", f(t, m));
      if (m) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace cslid
