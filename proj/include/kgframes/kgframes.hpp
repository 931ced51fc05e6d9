#pragma once

#include "kgframes/algebra.hpp"
#include "kgframes/complex_matrix.hpp"
#include "kgframes/constructions.hpp"
#include "kgframes/eig.hpp"
#include "kgframes/errors.hpp"
#include "kgframes/frame.hpp"
#include "kgframes/fuzz.hpp"
#include "kgframes/generators.hpp"
#include "kgframes/module.hpp"
#include "kgframes/report.hpp"
#include "kgframes/rng.hpp"
#include "kgframes/scenario.hpp"
#include "kgframes/svd.hpp"
