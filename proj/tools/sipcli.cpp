#include "sip/cli.hpp"

int main(int argc, char** argv) { return sip::cli_main(argc, argv); }
