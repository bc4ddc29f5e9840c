#include "infoflow/pipeline.hpp"

#include <doctest.h>

using namespace infoflow;
