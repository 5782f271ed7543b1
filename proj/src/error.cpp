#include "layerlens/error.hpp"

namespace layerlens {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::io: return "io";
    case ErrorCategory::format: return "format";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::bounds: return "bounds";
    case ErrorCategory::shape: return "shape";
    case ErrorCategory::empty: return "empty";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::degenerate: return "degenerate";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::config: return "config";
    case ErrorCategory::lookup: return "lookup";
    case ErrorCategory::generation: return "generation";
    case ErrorCategory::rank: return "rank";
    case ErrorCategory::usage: return "usage";
  }
  return "unknown";
}

}  // namespace layerlens
