#pragma once

#include "classify.hpp"
#include "complex_mobius.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "groups.hpp"
#include "io.hpp"
#include "normalize.hpp"
#include "parallel.hpp"
#include "regions.hpp"
#include "render.hpp"
#include "sampling.hpp"
#include "slices.hpp"
#include "tolerances.hpp"
#include "verify.hpp"
#include "words.hpp"
