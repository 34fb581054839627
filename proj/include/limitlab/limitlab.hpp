#pragma once

// umbrella header

#include "limitlab/complex_io.hpp"
#include "limitlab/config.hpp"
#include "limitlab/conjugacy.hpp"
#include "limitlab/curves.hpp"
#include "limitlab/cycles.hpp"
#include "limitlab/fatou.hpp"
#include "limitlab/henon.hpp"
#include "limitlab/image.hpp"
#include "limitlab/koenigs.hpp"
#include "limitlab/limit_algebra.hpp"
#include "limitlab/natural_extension.hpp"
#include "limitlab/parallel.hpp"
#include "limitlab/polynomial.hpp"
#include "limitlab/rational.hpp"
#include "limitlab/rng.hpp"
#include "limitlab/roots.hpp"
#include "limitlab/solenoid.hpp"
