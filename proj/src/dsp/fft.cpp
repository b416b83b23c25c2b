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
#include "aeromamba/dsp/fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace aeromamba::dsp {
namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

const RealFft& RealFft::of_size(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<RealFft>(new RealFft(n))).first;
  }
  return *it->second;
}

RealFft::RealFft(std::size_t n) : n_(n) {
  std::vector<double> real(n);
  std::vector<std::complex<double>> spectrum(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(spectrum.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ =
      fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, flags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(),
                                       flags | FFTW_DESTROY_INPUT);
}

RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  // FFTW's r2c does not modify its input even though the API is non-const.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(const std::complex<double>* in, double* out) const {
  thread_local std::vector<std::complex<double>> scratch;
  scratch.assign(in, in + bins());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace aeromamba::dsp
