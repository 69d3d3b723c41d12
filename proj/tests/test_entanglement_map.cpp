#include <catch2/catch_amalgamated.hpp>
#include "tanglemap/pipeline.hpp"
