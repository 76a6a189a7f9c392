#pragma once

#include "ringcav/drift.hpp"
#include "ringcav/errors.hpp"
#include "ringcav/format.hpp"
#include "ringcav/geometry.hpp"
#include "ringcav/oracle.hpp"
#include "ringcav/params.hpp"
#include "ringcav/random.hpp"
#include "ringcav/spectra.hpp"
#include "ringcav/steady.hpp"
#include "ringcav/verify.hpp"
