#include "mple/cli.hpp"

int main(int argc, char** argv) { return mple::cli_dispatch(argc, argv); }
