#pragma once

#include <fstream>
#include <string>

namespace ontomatch {

// Both throw IoError naming the path when the file cannot be opened.
std::ifstream open_input(const std::string& path, bool binary = false);
std::ofstream open_output(const std::string& path, bool binary = false);

// Throws IoError if the stream is in a failed state after writing.
void check_written(std::ostream& out, const std::string& what);

}  // namespace ontomatch
