#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "ontomatch/log.hpp"

int main(int argc, char** argv) {
  // Skip warnings that tests trigger on purpose.
  ontomatch::set_log_level(ontomatch::LogLevel::kError);
  doctest::Context context(argc, argv);
  return context.run();
}
