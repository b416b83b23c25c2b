// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AEROMAMBA_DSP_FFT_HPP_
#define AEROMAMBA_DSP_FFT_HPP_

#include <complex>
#include <cstddef>

namespace aeromamba::dsp {

// Unnormalized real FFT of a fixed size backed by FFTW. Plans are cached per
// size and created with FFTW_ESTIMATE so results are reproducible run to run.
// Instances are immutable and safe to use from several threads.
class RealFft {
 public:
  static const RealFft& of_size(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // out[k] = sum_m in[m] exp(-2 pi i k m / n), k = 0 .. n/2.
  void forward(const double* in, std::complex<double>* out) const;
  // out[m] = sum_{k=0}^{n-1} X[k] exp(2 pi i k m / n) with the Hermitian
  // extension of in[0 .. n/2]; imaginary parts of DC and Nyquist ignored.
  // Not scaled by 1/n.
  void inverse(const std::complex<double>* in, double* out) const;

  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

 private:
  explicit RealFft(std::size_t n);

  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace aeromamba::dsp

#endif  // AEROMAMBA_DSP_FFT_HPP_
