# filename: __init__.py.py
# @Time    : 2025/8/15 19:40
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
