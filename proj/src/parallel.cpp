#include "bgkale/parallel.hpp"

namespace bgkale {

Executor::Executor(int workers) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers_ = workers;
}

void PhaseTimer::accumulate(std::vector<Entry>& into, std::string_view label, double seconds) {
  for (auto& [name, total] : into) {
    if (name == label) {
      total += seconds;
      return;
    }
  }
  into.emplace_back(std::string(label), seconds);
}

double PhaseTimer::lookup(const std::vector<Entry>& in, std::string_view label) {
  for (const auto& [name, total] : in)
    if (name == label) return total;
  return 0.0;
}

void PhaseTimer::add(std::string_view label, double seconds) {
  accumulate(step_, label, seconds);
  accumulate(cumulative_, label, seconds);
}

void PhaseTimer::begin_step() { step_.clear(); }

double PhaseTimer::step_total(std::string_view label) const { return lookup(step_, label); }

double PhaseTimer::cumulative_total(std::string_view label) const {
  return lookup(cumulative_, label);
}

void PhaseTimer::reset() {
  step_.clear();
  cumulative_.clear();
}

}  // namespace bgkale
