#pragma once

#include "rbelast/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace rbe {

inline constexpr std::uint32_t kArchiveVersion = 1;

/// Text manifest followed by a little-endian binary payload.
void save_model(const RBModel& model, std::ostream& out);
void save_model(const RBModel& model, const std::string& path);

/// Throws ArchiveError on version mismatch, truncation or checksum failure.
RBModel load_model(std::istream& in);
RBModel load_model(const std::string& path);

} // namespace rbe
