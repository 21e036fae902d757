#include "loopsoup/harness.hpp"
// Experiment runners land in this translation unit; see harness_experiments
// below. Placeholder during bring-up.
namespace loopsoup {}
