# coding=utf-8
"""Helper utilities: work directories, unique result file names and the
summary statistics written to result files.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import os
import getpass
from tempfile import mkstemp
from datetime import date

import numpy as np

from tilecast import config
from tilecast import LOGGER


def temp_dir(sub_dir='work'):
    """Obtain the temporary working directory for the operating system.

    A tilecast subdirectory will automatically be created under this.

    .. note:: You can use this together with unique_filename to create
       a file in a temporary directory, e.g.

       tmpdir = temp_dir('results')
       tmpfile = unique_filename(suffix='.csv', dir='results')
       /tmp/tilecast/2026-10-18/someone/results/tmpMRpF_C.csv

    If you specify TILECAST_WORK_DIR as an environment var, it will be
    used in preference to config.CACHE_DIR.

    :param sub_dir: Optional argument which will cause an additional
            subdirectory to be created e.g. ``/tmp/tilecast/foo/``.
    :type sub_dir: str

    :returns: Path to the working directory.
    :rtype: str
    """
    user = getpass.getuser().replace(' ', '_')
    date_string = date.today().isoformat()
    if 'TILECAST_WORK_DIR' in os.environ:
        new_directory = os.environ['TILECAST_WORK_DIR']
    else:
        new_directory = config.CACHE_DIR

    path = os.path.join(new_directory, 'tilecast', date_string, user, sub_dir)

    if not os.path.exists(path):
        # Ensure that the dir is world writable
        # Umask sets the new mask and returns the old
        old_mask = os.umask(0000)
        try:
            os.makedirs(path, 0o0777)
        except OSError:
            # one of the directories in the path already exists maybe
            pass
        os.umask(old_mask)
        if not os.path.exists(path):
            raise OSError('Could not create working directory %s' % path)

    return path


def unique_filename(**kwargs):
    """Create new filename guaranteed not to exist previously.

    :param kwargs: Keyword arguments passed on to ``mkstemp(**kwargs)``. A
        ``dir`` argument names a sub directory of temp_dir; without it the
        'results' sub directory is used.

    Use mkstemp to create the file, then remove it and return the name.

    :returns: The file name.
    :rtype: str
    """
    kwargs['dir'] = temp_dir(kwargs.get('dir', 'results'))
    handle, filename = mkstemp(**kwargs)

    # Need to close it using the filehandle first for windows!
    os.close(handle)
    try:
        os.remove(filename)
    except OSError:
        pass
    LOGGER.debug('Reserved output file name %s' % filename)
    return filename


def mean_and_stderr(values):
    """Compute the sample mean and the standard error of the mean.

    :param values: Sample values.
    :type values: list

    :returns: Two-tuple (mean, standard error). The standard error is 0 for
        a single sample and both are nan for an empty list.
    :rtype: (float, float)
    """
    samples = np.asarray(values, dtype=float)
    if samples.size == 0:
        return float('nan'), float('nan')
    mean = float(np.mean(samples))
    if samples.size == 1:
        return mean, 0.0
    stderr = float(np.std(samples, ddof=1) / np.sqrt(samples.size))
    return mean, stderr


def paired_gap_confidence(lower, higher, z_value=1.96):
    """Check that paired samples of higher exceed lower with confidence.

    :param lower: Per trial values of the scheme expected to be lower.
    :type lower: list

    :param higher: Per trial values of the scheme expected to be higher,
        paired with lower by trial index.
    :type higher: list

    :param z_value: Normal quantile of the one sided confidence level.
    :type z_value: float

    :returns: True when the lower confidence bound of mean(higher - lower)
        is positive.
    :rtype: bool
    """
    diff = np.asarray(higher, dtype=float) - np.asarray(lower, dtype=float)
    mean, stderr = mean_and_stderr(diff)
    return bool(mean - z_value * stderr > 0)
