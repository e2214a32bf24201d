#pragma once

#include <string>

namespace tizx {

/// Writes to a temporary sibling, then renames over `path`. Creates parent
/// directories. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace tizx
