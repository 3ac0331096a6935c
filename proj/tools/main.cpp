#include <cstdio>
#include <exception>

#include <fmt/format.h>

#include "commands.hpp"
#include "rayleigh/errors.hpp"

int main(int argc, char** argv) {
  try {
    return rayleigh::cli::run(argc, argv);
  } catch (const rayleigh::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return rayleigh::is_numerical(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
}
