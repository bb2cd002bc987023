#include "ontomatch/io.hpp"

#include <cerrno>
#include <cstring>

#include "ontomatch/errors.hpp"

namespace ontomatch {

std::ifstream open_input(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::in | std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + path + "' for reading: " + std::strerror(errno));
  return in;
}

std::ofstream open_output(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::out | std::ios::binary | std::ios::trunc
                                 : std::ios::out | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  return out;
}

void check_written(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw IoError("write failed: " + what);
}

}  // namespace ontomatch
