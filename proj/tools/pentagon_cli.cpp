#include <pentagon/cli.hpp>

int main(int argc, char** argv) { return pentagon::cli::run(argc, argv, std::cout, std::cerr); }
