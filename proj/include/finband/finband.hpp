#pragma once

#include "finband/covering.hpp"
#include "finband/ergodic.hpp"
#include "finband/errors.hpp"
#include "finband/floquet.hpp"
#include "finband/green.hpp"
#include "finband/inverse.hpp"
#include "finband/perm.hpp"
#include "finband/poly.hpp"
#include "finband/serialize.hpp"
