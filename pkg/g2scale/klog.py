import logging
import os
import sys

FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class klog():
    def __init__(self, name="g2scale", level=logging.WARNING):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)
        self.logger.propagate = False
        self.formatter = logging.Formatter(FORMAT)
        self.console_handler = logging.StreamHandler(sys.stderr)
        self.console_handler.setLevel(level)
        self.console_handler.setFormatter(self.formatter)
        self.file_handler = None
        if not self.logger.handlers:
            self.logger.addHandler(self.console_handler)
        self.logger.debug('Logger initialized')

    def get_logger(self):
        return self.logger

    def get_formatter(self):
        return self.formatter

    def set_level(self, level):
        if isinstance(level, str):
            level = logging.getLevelName(level.upper())
        self.logger.setLevel(level)
        for handler in self.logger.handlers:
            handler.setLevel(level)
        self.logger.debug('Logger level set to {}'.format(level))

    def add_file_handler(self, path=None):
        if path is None:
            path = os.path.join(os.getcwd(), 'klog.log')
        self.file_handler = logging.FileHandler(path)
        self.file_handler.setLevel(self.logger.level)
        self.file_handler.setFormatter(self.formatter)
        self.logger.addHandler(self.file_handler)
        self.logger.debug('File handler added: {}'.format(path))

    def remove_file_handler(self):
        if self.file_handler is not None:
            self.logger.removeHandler(self.file_handler)
            self.file_handler.close()
            self.file_handler = None

    def remove_all_handlers(self):
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)

    def log(self, message, *args):
        self.logger.info(message, *args)

    def debug(self, message, *args):
        self.logger.debug(message, *args)

    def warning(self, message, *args):
        self.logger.warning(message, *args)

    def error(self, message, *args):
        self.logger.error(message, *args)

    def critical(self, message, *args):
        self.logger.critical(message, *args)


klogger = klog()
