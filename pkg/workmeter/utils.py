# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Handy utils: output files with manifests, config files and logging setup.
"""
import io
import csv
import sys
import json
import time
import logging
import logging.config
import configparser

from plumbum import local


log = logging.getLogger('workmeter').getChild('utils')

DATEFMT = '%b %d %H:%M:%S'
FORMAT = "%(asctime)s [%(levelname)s] %(name)s %(filename)s:"\
    "%(lineno)d : %(message)s"

CONFIG_SECTION = 'workmeter'


def logging_config(level='INFO', stream=None):
    """Return a ``dictConfig`` mapping with one (colored if possible) stream
    handler.
    """
    stream = stream or sys.stderr
    isatty = stream.isatty()
    config = {
        'version': 1,
        'disable_existing_loggers': False,
        'handlers': {
            'stream': {
                'class': 'logging.StreamHandler',
                'formatter': 'colored' if isatty else 'default',
                'stream': stream,
            },
        },
        'formatters': {
            'default': {
                'format': FORMAT,
                'datefmt': DATEFMT
            },
        },
        'loggers': {
            '': {
                'handlers': ['stream'],
                'level': getattr(logging, level.upper()),
                'propagate': True
            },
        }
    }
    try:
        import colorlog
        config['formatters']['colored'] = {
            '()': colorlog.ColoredFormatter,
            'format': "%(log_color)s" + FORMAT,
            'datefmt': DATEFMT,
            'log_colors': {
                'CRITICAL': 'bold_red',
                'ERROR': 'red',
                'WARNING': 'purple',
                'INFO': 'green',
                'DEBUG': 'yellow'
            }
        }
    except ImportError:
        config['handlers']['stream']['formatter'] = 'default'
    return config


def configure_logging(level='INFO', stream=None):
    logging.config.dictConfig(logging_config(level, stream))


def load_config(path):
    """Parse a flat ``key = value`` file into a dict of strings.

    ``#`` starts a comment; keys are case sensitive.
    """
    parser = configparser.ConfigParser(
        comment_prefixes=('#',), inline_comment_prefixes=('#',),
        interpolation=None)
    parser.optionxform = str
    with open(str(path)) as fp:
        text = fp.read()
    parser.read_string(u'[{}]\n{}'.format(CONFIG_SECTION, text),
                       source=str(path))
    return dict(parser[CONFIG_SECTION])


def format_value(value):
    """Text for a CSV cell; floats use their shortest round trip repr.
    """
    if isinstance(value, float):
        return repr(float(value))
    if hasattr(value, 'dtype') and value.dtype.kind == 'f':
        return repr(float(value))
    return str(value)


class RunManifest(object):
    """What produced an output file: command, resolved config and seed.
    """
    def __init__(self, command, config, seed, version, outputs=(),
                 summary=None):
        self.command = command
        self.config = dict(config)
        self.seed = seed
        self.version = version
        self.outputs = [str(path) for path in outputs]
        self.summary = summary or {}
        self.timestamp = time.strftime('%Y-%m-%dT%H:%M:%S%z')

    def as_dict(self):
        return {
            'command': self.command,
            'config': self.config,
            'seed': self.seed,
            'version': self.version,
            'timestamp': self.timestamp,
            'outputs': self.outputs,
            'summary': self.summary,
        }

    def write(self, path):
        with open(str(path), 'w') as fp:
            json.dump(self.as_dict(), fp, indent=2, sort_keys=True,
                      default=_jsonable)
            fp.write('\n')


def _jsonable(obj):
    if hasattr(obj, 'tolist'):
        return obj.tolist()
    raise TypeError("{!r} is not JSON serializable".format(obj))


def manifest_path(path):
    path = local.path(path)
    return path.dirname / (path.name + '.manifest.json')


class ResultFile(object):
    """Proxy for writing an output file and its sibling manifest.

    Rows can be streamed to ``<path>.partial`` while a run is in progress;
    ``commit`` writes the final file. The manifest is written on exit in
    either case and records whether the output is complete.
    """
    def __init__(self, path, manifest):
        self.path = local.path(path)
        self.partial = self.path.dirname / (self.path.name + '.partial')
        self.manifest = manifest
        self.manifest.outputs = [str(self.path)]
        self.complete = False
        self._header = None

    def _writefile(self, path, contents):
        with open(str(path), 'w', newline='') as fp:
            fp.write(contents)

    def write_rows(self, header, rows):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
        self._writefile(self.path, buf.getvalue())
        log.info("wrote '{}'".format(self.path))

    def write_json(self, data):
        self._writefile(self.path, json.dumps(
            data, indent=2, sort_keys=True, default=_jsonable) + '\n')
        log.info("wrote '{}'".format(self.path))

    def append_row(self, header, row):
        """Stream a row to the partial file.
        """
        new = self._header is None
        with open(str(self.partial), 'a' if not new else 'w',
                  newline='') as fp:
            writer = csv.writer(fp, lineterminator='\n')
            if new:
                writer.writerow(header)
                self._header = header
            writer.writerow([format_value(v) for v in row])

    def commit(self, header=None, rows=None, data=None):
        if rows is not None:
            self.write_rows(header, rows)
        elif data is not None:
            self.write_json(data)
        if self.partial.exists():
            self.partial.delete()
        self.complete = True

    def __enter__(self):
        return self

    def __exit__(self, exception_type, exception_val, trace):
        self.manifest.summary['complete'] = self.complete
        if not self.complete and self.partial.exists():
            self.manifest.outputs = [str(self.partial)]
        try:
            self.manifest.write(manifest_path(self.path))
        except OSError:
            if exception_type is None:
                raise
            log.error("could not write manifest for '{}'".format(self.path))
