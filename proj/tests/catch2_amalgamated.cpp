// Single-TU build of the amalgamated Catch2 v3 distribution (provides main()).
#include <catch2/catch_amalgamated.cpp>
