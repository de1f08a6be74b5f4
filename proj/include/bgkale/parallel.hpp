#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace bgkale {

/// Data-parallel loop over an index range.
///
/// The range is cut into `workers` contiguous chunks that depend only on the
/// range length and the worker count; each index is visited exactly once by
/// one worker. Kernels that write only to the slot of their own index and
/// reduce in a fixed order inside that slot therefore produce bitwise
/// identical results for every worker count. If kernels throw, the exception
/// of the lowest failing index is rethrown, as a serial loop would.
class Executor {
 public:
  /// `workers <= 0` selects the available hardware parallelism.
  explicit Executor(int workers = 1);

  int workers() const noexcept { return workers_; }

  template <typename Kernel>
  void for_each(std::size_t n, Kernel&& kernel) const;

 private:
  int workers_;
};

template <typename Kernel>
void Executor::for_each(std::size_t n, Kernel&& kernel) const {
  if (n == 0) return;
  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers_), n);
  if (chunks <= 1) {
    for (std::size_t i = 0; i < n; ++i) kernel(i);
    return;
  }

  std::vector<std::size_t> failed_at(chunks, n);
  std::vector<std::exception_ptr> errors(chunks);
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        kernel(i);
      } catch (...) {
        failed_at[c] = i;
        errors[c] = std::current_exception();
        return;
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    threads.reserve(chunks - 1);
    for (std::size_t c = 1; c < chunks; ++c) threads.emplace_back(run_chunk, c);
    run_chunk(0);
  }
  for (std::size_t c = 0; c < chunks; ++c)
    if (errors[c]) std::rethrow_exception(errors[c]);
}

/// kernel(i) for every particle i in [0, n).
template <typename Kernel>
void par_map_particles(const Executor& exec, std::size_t n, Kernel&& kernel) {
  exec.for_each(n, std::forward<Kernel>(kernel));
}

/// kernel(i, k) for every (particle, velocity node) pair.
template <typename Kernel>
void par_map_phase(const Executor& exec, std::size_t n_particles, std::size_t n_nodes,
                   Kernel&& kernel) {
  if (n_nodes == 0) return;
  exec.for_each(n_particles * n_nodes,
                [&](std::size_t flat) { kernel(flat / n_nodes, flat % n_nodes); });
}

/// Phase labels of the per-step cost breakdown.
namespace phase {
inline constexpr std::string_view neighbor_search = "Neighbor Search";
inline constexpr std::string_view particle_organization = "Particle Organization";
inline constexpr std::string_view spatial_derivative = "Spatial Derivative Approximation";
inline constexpr std::string_view update_moment = "Update Moment";
inline constexpr std::string_view update_function = "Update Function";
inline constexpr std::string_view boundary_interpolation =
    "Interpolate Distribution Function on Boundary";
inline constexpr std::string_view diffuse_reflection = "Diffusive reflection Boundary Condition";
inline constexpr std::string_view diagnostics = "Diagnostics";
}  // namespace phase

/// Wall-clock accumulator keyed by phase label, in first-use order.
class PhaseTimer {
 public:
  using Entry = std::pair<std::string, double>;

  template <typename Thunk>
  double time(std::string_view label, Thunk&& thunk) {
    const auto start = std::chrono::steady_clock::now();
    std::forward<Thunk>(thunk)();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    add(label, elapsed.count());
    return elapsed.count();
  }

  void add(std::string_view label, double seconds);
  void begin_step();

  double step_total(std::string_view label) const;
  double cumulative_total(std::string_view label) const;
  const std::vector<Entry>& step() const noexcept { return step_; }
  const std::vector<Entry>& cumulative() const noexcept { return cumulative_; }
  void reset();

 private:
  static void accumulate(std::vector<Entry>& into, std::string_view label, double seconds);
  static double lookup(const std::vector<Entry>& in, std::string_view label);

  std::vector<Entry> step_;
  std::vector<Entry> cumulative_;
};

}  // namespace bgkale
