#pragma once

#include "eif/bench.hpp"
#include "eif/block.hpp"
#include "eif/container.hpp"
#include "eif/correlation.hpp"
#include "eif/cosine_transform.hpp"
#include "eif/dictionary.hpp"
#include "eif/error.hpp"
#include "eif/folding.hpp"
#include "eif/image.hpp"
#include "eif/metrics.hpp"
#include "eif/nullspace.hpp"
#include "eif/parallel.hpp"
#include "eif/pursuit.hpp"
#include "eif/rng.hpp"
