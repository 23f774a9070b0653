#pragma once
#include <complex>
#include <cstddef>
#include <vector>

namespace unidec {

using cplx = std::complex<double>;

// Radix-2 iterative FFT for one fixed power-of-two length. Twiddles are
// precomputed once; transforms are in-place on caller buffers and re-entrant,
// so lines can be processed from multiple threads without locking.
class Fft {
 public:
  explicit Fft(int n);

  int size() const { return n_; }

  // Unnormalized DFT, sign convention e^{-2*pi*i*j*m/n}.
  void forward(cplx* a) const { run(a, false); }
  // Unnormalized inverse kernel (sign +, no 1/n factor).
  void inverse(cplx* a) const { run(a, true); }

  // Strided line transform: gathers n elements spaced `stride` apart starting
  // at `base` into `scratch`, transforms, scales, and scatters back.
  void line(cplx* base, std::size_t stride, bool inv, double scale,
            cplx* scratch) const;

 private:
  void run(cplx* a, bool inv) const;
  int n_;
  std::vector<int> rev_;
  std::vector<cplx> w_;  // e^{-2*pi*i*j/n}, j < n/2
};

// O(n^2) reference DFT with the same conventions; the oracle the fast path is
// tested against.
void naive_dft(const cplx* in, cplx* out, int n, bool inv);

}  // namespace unidec
