#pragma once

#include <algorithm>
#include <exception>
#include <vector>

namespace webspline::detail {

// Runs compute(state, n, local) for n in [0, count) in parallel chunks and
// then scatter(n, local) serially in increasing n, so every reduction sees
// the same summation order regardless of the thread count. Each thread owns
// one State built by make_state(). The first exception in index order wins.
template <class State, class Local, class MakeState, class Compute, class Scatter>
void cell_loop(int count, MakeState&& make_state, Compute&& compute, Scatter&& scatter,
               int chunk = 256) {
  std::vector<Local> locals(static_cast<std::size_t>(std::max(0, std::min(chunk, count))));
  std::vector<std::exception_ptr> errors(locals.size());
  for (int start = 0; start < count; start += chunk) {
    const int end = std::min(count, start + chunk);
#pragma omp parallel
    {
      State state = make_state();
#pragma omp for schedule(dynamic, 4)
      for (int n = start; n < end; ++n) {
        try {
          compute(state, n, locals[n - start]);
        } catch (...) {
          errors[n - start] = std::current_exception();
        }
      }
    }
    for (int n = start; n < end; ++n)
      if (errors[n - start]) std::rethrow_exception(errors[n - start]);
    for (int n = start; n < end; ++n) scatter(n, locals[n - start]);
  }
}

}  // namespace webspline::detail
