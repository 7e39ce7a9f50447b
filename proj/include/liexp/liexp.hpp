#pragma once

#include "liexp/core.hpp"
#include "liexp/enveloping.hpp"
#include "liexp/expm.hpp"
#include "liexp/exponentiate.hpp"
#include "liexp/fixtures.hpp"
#include "liexp/identities.hpp"
#include "liexp/lie_core.hpp"
#include "liexp/problem.hpp"
#include "liexp/quadrature.hpp"
#include "liexp/repspace.hpp"
#include "liexp/runner.hpp"
#include "liexp/semigroup.hpp"
