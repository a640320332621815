#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tomo {

// Deliberate breakage for exercising the selftest harness itself.
// kSkipQrColumn drops the last basis column from every projector, which
// must trip the annihilation invariant.
enum class SelftestFault { kNone, kSkipQrColumn };

struct SelftestReport {
  struct Item {
    std::string name;
    bool passed = false;
    std::string detail;
  };
  std::vector<Item> items;

  bool all_passed() const {
    for (const auto& it : items)
      if (!it.passed) return false;
    return true;
  }
};

// Fast invariant suite: projection algebra, belief normalization, fixed
// points, two-stream exactness, noiseless recovery. quick trims the trial
// counts so the run stays well under ten seconds.
SelftestReport run_selftest(bool quick, SelftestFault fault = SelftestFault::kNone,
                            std::uint64_t seed = 0xb0a710c5ULL);

}  // namespace tomo
