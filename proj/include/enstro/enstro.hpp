#pragma once

#include "enstro/errors.hpp"
#include "enstro/field.hpp"
#include "enstro/burgers.hpp"
#include "enstro/oracles.hpp"
#include "enstro/conslaw.hpp"
#include "enstro/extremizers.hpp"
#include "enstro/bounds.hpp"
#include "enstro/io.hpp"
