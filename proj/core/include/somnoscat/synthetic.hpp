#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "somnoscat/record.hpp"

namespace somnoscat {

enum class ArousalKind { Target, NonTarget };

struct ArousalWindow {
  double start_s = 0;
  double end_s = 0;
  ArousalKind kind = ArousalKind::Target;
};

/// Deterministic synthetic PSG record. Baseline channels are band-limited
/// noise shaped per channel class; target windows carry a respiratory-band
/// amplitude boost plus an EEG delta burst, non-target windows an
/// apnea-like airflow reduction. duration_s must be a positive multiple of
/// 5 and windows must be non-overlapping and inside the record.
std::pair<PsgRecord, AnnotationTrack> generate_synthetic(
    std::uint64_t seed, double duration_s,
    const std::vector<ArousalWindow>& arousal_windows);

}  // namespace somnoscat
