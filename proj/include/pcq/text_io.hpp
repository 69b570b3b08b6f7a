#pragma once

#include <string>

namespace pcq {

std::string read_text_file(const std::string& path);
/// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pcq
