#include "adcnet/cli.hpp"

int main(int argc, char** argv) { return adcnet::cli::dispatch(argc, argv); }
