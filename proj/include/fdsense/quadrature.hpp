#pragma once

#include <cmath>
#include <concepts>

namespace fdsense {

namespace detail {

template <std::floating_point Scalar, typename F>
Scalar simpson_refine(const F& f, Scalar a, Scalar fa, Scalar b, Scalar fb, Scalar mid, Scalar fmid,
                      Scalar whole, Scalar tol, int depth) {
  const Scalar left_mid = (a + mid) / 2;
  const Scalar right_mid = (mid + b) / 2;
  const Scalar f_left = f(left_mid);
  const Scalar f_right = f(right_mid);
  const Scalar left = (mid - a) / 6 * (fa + 4 * f_left + fmid);
  const Scalar right = (b - mid) / 6 * (fmid + 4 * f_right + fb);
  const Scalar delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) {
    return left + right + delta / 15;
  }
  return simpson_refine(f, a, fa, mid, fmid, left_mid, f_left, left, tol / 2, depth - 1) +
         simpson_refine(f, mid, fmid, b, fb, right_mid, f_right, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance abs_tol.
///
/// The interval is pre-split into a few panels so that sharp features narrower
/// than the interval are not missed by the first coarse estimate.
template <std::floating_point Scalar, typename F>
Scalar integrate_adaptive_simpson(const F& f, Scalar a, Scalar b, Scalar abs_tol,
                                  int max_depth = 48, int panels = 8) {
  if (a == b) return Scalar(0);
  Scalar total = 0;
  const Scalar width = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const Scalar lo = a + width * i;
    const Scalar hi = i + 1 == panels ? b : a + width * (i + 1);
    const Scalar mid = (lo + hi) / 2;
    const Scalar flo = f(lo);
    const Scalar fhi = f(hi);
    const Scalar fmid = f(mid);
    const Scalar whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi);
    total += detail::simpson_refine(f, lo, flo, hi, fhi, mid, fmid, whole, abs_tol / panels,
                                    max_depth);
  }
  return total;
}

}  // namespace fdsense
