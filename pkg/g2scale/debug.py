import sys
from colorama import Fore, Style, init

init()

colortags = {
    "WARNING": Fore.YELLOW,
    "ERROR": Fore.RED,
    "INFO": Fore.GREEN,
    "DEBUG": Fore.BLUE,
}


def de_bug(message, type, stream=None):
    # diagnostics go to stderr, stdout is reserved for json
    stream = sys.stderr if stream is None else stream
    if type in colortags:
        print(colortags[type] + "<<" + type + ">> " + Style.RESET_ALL + str(message), file=stream)
    else:
        print(str(message), file=stream)
