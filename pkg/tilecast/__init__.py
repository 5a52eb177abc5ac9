# coding=utf-8

"""
This is the main package for the tiled 360 video multicast planner.

Computes minimum total power transmission plans (beamformers, subcarrier
assignment, power and rate) for multicasting a multi-quality tiled 360 video
to several users over a MIMO-OFDMA downlink.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""

import os
import logging
import tempfile


def add_handler_once(logger, handler):
    """A helper to add a handler to a logger, ensuring there are no duplicates.

    Args:
        * logger: logging.logger instance
        * handler: logging.Handler instance to be added. It will not be
            added if an instance of that Handler subclass already exists.

    Returns:
        bool: True if the logging handler was added

    Raises:
        None
    """
    class_name = handler.__class__.__name__
    for existing_handler in logger.handlers:
        if existing_handler.__class__.__name__ == class_name:
            return False

    logger.addHandler(handler)
    return True


def setup_logger():
    """Set up our logger with optional sentry support.

    The log file can be moved with TILECAST_LOGFILE, the console level set
    with TILECAST_LOG_LEVEL, and sentry reporting is switched on by giving a
    DSN in TILECAST_SENTRY_DSN.
    """
    logger = logging.getLogger('tilecast')
    logger.setLevel(logging.DEBUG)
    # create formatter that will be added to the handlers
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    # so e.g. jenkins can override log dir.
    if 'TILECAST_LOGFILE' in os.environ:
        file_name = os.environ['TILECAST_LOGFILE']
    else:
        file_name = os.path.join(tempfile.gettempdir(), 'tilecast.log')
    file_handler = logging.FileHandler(file_name)
    file_handler.setLevel(logging.DEBUG)
    # create console handler with a higher log level
    console_level = os.environ.get('TILECAST_LOG_LEVEL', 'INFO').upper()
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, console_level, logging.INFO))

    sentry_dsn = os.environ.get('TILECAST_SENTRY_DSN')
    if sentry_dsn:
        try:
            # pylint: disable=F0401
            # noinspection PyUnresolvedReferences
            from raven.handlers.logging import SentryHandler
            # noinspection PyUnresolvedReferences
            from raven import Client
            # pylint: enable=F0401
            client = Client(sentry_dsn)
            sentry_handler = SentryHandler(client)
            sentry_handler.setFormatter(formatter)
            sentry_handler.setLevel(logging.ERROR)
            add_handler_once(logger, sentry_handler)
            logger.debug('Sentry logging enabled')

        except ImportError:
            logger.debug('Sentry logging disabled. Try pip install raven')

    # Set formatters
    file_handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)

    # add the handlers to the logger
    add_handler_once(logger, file_handler)
    add_handler_once(logger, console_handler)


setup_logger()
LOGGER = logging.getLogger('tilecast')
