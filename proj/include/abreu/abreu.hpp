#pragma once

#include "abreu/abreu_operator.hpp"
#include "abreu/error.hpp"
#include "abreu/extremal.hpp"
#include "abreu/functional.hpp"
#include "abreu/legendre.hpp"
#include "abreu/mollify.hpp"
#include "abreu/optimizer.hpp"
#include "abreu/pl_exact.hpp"
#include "abreu/polytope.hpp"
#include "abreu/potentials.hpp"
#include "abreu/quadrature.hpp"
#include "abreu/region.hpp"
#include "abreu/stability.hpp"
#include "abreu/types.hpp"
